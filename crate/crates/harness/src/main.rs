fn main() {
    std::process::exit(pbdw_harness::cli::run(std::env::args_os()));
}
