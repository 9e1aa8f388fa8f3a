use clap::Parser;

fn main() {
    let cli = scwd_cli::Cli::parse();
    if let Err(err) = scwd_cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(scwd_cli::exit_code(&err));
    }
}
