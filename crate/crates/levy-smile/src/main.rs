fn main() {
    std::process::exit(levy_smile::cli::run(std::env::args_os()));
}
