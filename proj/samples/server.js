import express from "express";
import fs from "node:fs";
const { quickSecureHash } = require("quick-secure-hash");
import { helper } from "./helper.js";

const app = express();
app.get("/", (req, res) => res.send(quickSecureHash(fs.readFileSync("x"))));
