fn main() {
    std::process::exit(pd_limits::cli::run(std::env::args_os()));
}
