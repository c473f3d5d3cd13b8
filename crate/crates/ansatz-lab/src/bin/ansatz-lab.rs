fn main() {
    std::process::exit(ansatz_lab::cli::main_with(clap::Parser::parse()));
}
