# merozeta HTTP service
