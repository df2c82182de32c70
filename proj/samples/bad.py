import os
import json

import requests
import securehashlib

def fetch(url):
    digest = securehashlib.sha256(url.encode()).hexdigest()
    return requests.get(url, headers={"X-Digest": digest}).json()
