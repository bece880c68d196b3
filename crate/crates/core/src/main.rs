fn main() {
    std::process::exit(wgswitch::cli::run(std::env::args_os()));
}
