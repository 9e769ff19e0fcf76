from maxrep.runner import main

main()
