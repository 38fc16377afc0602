from qproc.cli import main

main()
