from reductionlab.cli import main

main()
