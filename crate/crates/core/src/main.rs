fn main() {
    std::process::exit(bloch_geometry::sweep::run_cli(std::env::args_os()));
}
