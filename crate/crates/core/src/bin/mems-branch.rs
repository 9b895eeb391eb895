fn main() {
    std::process::exit(mems_branch::cli::main_with_args(std::env::args_os()).into());
}
