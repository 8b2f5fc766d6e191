fn main() {
    std::process::exit(strongdamp::analysis::run_cli(std::env::args_os()));
}
