package main

import (
	"fmt"

	"example.com/calc/ops"
)

// Prints 2+3 and 2*3.
func main() {
	fmt.Println(ops.Add(2, 3), ops.Mul(2, 3))
}
