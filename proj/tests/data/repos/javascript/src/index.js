const api = require('./api');
import { fmt } from './lib/format.js';
import React from 'react';

// Entry point: print one timing twice.
function main() {
  console.log(api.report(12.5));
  console.log(fmt(3), React.version);
}

main();
