use clap::Parser;

fn main() {
    let cli = marchenko::cli::Cli::parse();
    std::process::exit(marchenko::cli::run(cli));
}
