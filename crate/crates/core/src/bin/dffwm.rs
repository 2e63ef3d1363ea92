fn main() {
    std::process::exit(dffwm::cli::main());
}
