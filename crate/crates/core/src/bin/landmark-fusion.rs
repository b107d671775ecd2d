fn main() {
    std::process::exit(landmark_fusion::cli::main_with_args(std::env::args_os()));
}
