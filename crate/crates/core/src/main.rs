fn main() -> std::process::ExitCode {
    vnsim::cli::main()
}
