use clap::Parser;

fn main() {
    let cli = dpcolor_cli::args::Cli::parse();
    if let Err(e) = dpcolor_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
