fn main() {
    std::process::exit(gfcount::cli::run(std::env::args_os()));
}
