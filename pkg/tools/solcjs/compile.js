// Reads a solc standard-JSON input on stdin, writes the standard-JSON output to stdout.
const solc = require("solc");
let input = "";
process.stdin.on("data", (d) => (input += d));
process.stdin.on("end", () => {
  process.stdout.write(solc.compile(input));
});
