fn main() {
    std::process::exit(justdist::interface::cli::run(std::env::args_os()));
}
