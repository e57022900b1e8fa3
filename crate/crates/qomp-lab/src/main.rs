fn main() {
    std::process::exit(qomp_lab::cli::main());
}
