from gcm_lab.cli import main

raise SystemExit(main())
