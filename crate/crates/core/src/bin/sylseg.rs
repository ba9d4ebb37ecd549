fn main() {
    std::process::exit(sylseg::cli::run(std::env::args_os()));
}
