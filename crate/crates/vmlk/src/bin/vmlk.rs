fn main() {
    eprintln!("not wired up yet");
    std::process::exit(2);
}
