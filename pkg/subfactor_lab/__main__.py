from subfactor_lab.cli import main

main()
