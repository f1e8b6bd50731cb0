fn main() {
    let code = lattice_teleport::cli::execute(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
