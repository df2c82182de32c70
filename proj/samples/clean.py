import os
import sys
from collections import OrderedDict

print(OrderedDict(a=sys.argv[0], cwd=os.getcwd()))
