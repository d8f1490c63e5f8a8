use clap::Parser;

fn main() {
    let cli = gcnet_cli::Cli::parse();
    if let Err(e) = gcnet_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
