use clap::Parser;
use focklab_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(kind) => kind.code(),
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.kind().code()
        }
    };
    std::process::exit(code);
}
