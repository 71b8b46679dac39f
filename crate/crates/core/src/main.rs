use clap::Parser;

fn main() {
    let cli = treerep::cli::Cli::parse();
    std::process::exit(treerep::cli::run(cli));
}
