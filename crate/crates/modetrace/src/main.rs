fn main() {
    std::process::exit(modetrace::cli::run(std::env::args_os()));
}
