fn main() {
    std::process::exit(bellbidir::cli::run(std::env::args_os()));
}
