import sys

from smsvm.app.main import main

sys.exit(main())
