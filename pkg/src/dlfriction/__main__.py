from dlfriction.cli import main

main()
