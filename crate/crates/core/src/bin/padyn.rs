fn main() {
    let code = padic_dynamics::cli::main_entry();
    std::process::exit(code);
}
