fn main() {
    std::process::exit(keymesh::cli::run_from_env());
}
