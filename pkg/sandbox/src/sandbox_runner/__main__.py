from sandbox_runner.protocol import main

if __name__ == "__main__":
    main()
