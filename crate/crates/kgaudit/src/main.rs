use clap::Parser;

fn main() {
    let cli = kgaudit::cli::Cli::parse();
    if let Err(e) = kgaudit::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
