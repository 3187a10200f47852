fn main() {
    std::process::exit(uusd_ea::cli::main(std::env::args_os()));
}
