use clap::Parser;
use corn_cli::{Cli, EXIT_CONFIG, EXIT_OK};

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => corn_cli::run(cli),
        Err(e) => {
            // help and version land here too; usage errors count as config errors
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    };
    std::process::exit(code);
}
