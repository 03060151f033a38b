SERVICE = "parshare"
API_SERVICE = "parshare-api"
CLI_SERVICE = "parshare-cli"
