use clap::Parser;

fn main() {
    let cli = trapkit::cli::Cli::parse();
    std::process::exit(trapkit::cli::main_with(&cli));
}
