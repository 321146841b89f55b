use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match bfvae_cli::run(std::env::args_os(), &mut out) {
        Ok(()) => 0,
        Err(bfvae_cli::Failure::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(bfvae_cli::Failure::Command(e)) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    std::process::exit(code);
}
