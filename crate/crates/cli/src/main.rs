use clap::Parser;

fn main() {
    let cli = mwl_cli::Cli::parse();
    match mwl_cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
