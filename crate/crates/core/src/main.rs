fn main() {
    let env = std::env::vars().collect();
    std::process::exit(hardylab::cli::run(std::env::args_os().skip(1), &env));
}
