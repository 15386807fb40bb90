fn main() {
    std::process::exit(anneal_lab::harness::cli(std::env::args_os()));
}
