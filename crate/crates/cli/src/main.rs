use clap::Parser;

fn main() {
    let cli = basislab_cli::Cli::parse();
    if let Err(err) = basislab_cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
