use clap::Parser;

fn main() {
    let cli = pdsel::cli::Cli::parse();
    std::process::exit(pdsel::cli::run(cli));
}
