fn main() {
    std::process::exit(morphbox::cli::run(std::env::args_os()));
}
