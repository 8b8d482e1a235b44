package ops

// Mul multiplies two ints.
func Mul(a, b int) int {
	return a * b
}
