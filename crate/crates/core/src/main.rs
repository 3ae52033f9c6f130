fn main() {
    let code = orliczkit::cli::dispatch(std::env::args_os());
    std::process::exit(code);
}
