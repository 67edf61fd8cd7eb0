fn main() {
    std::process::exit(tvho::cli::dispatch(std::env::args()));
}
