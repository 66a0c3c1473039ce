console.log(require("solc").version());
