fn main() {
    std::process::exit(deepfuse_cli::run(std::env::args_os()));
}
