// 2-D convolution of a 16x16 image with a 3x3 kernel (valid region only).
const int H = 16;
const int W = 16;
const int K = 3;
const int OH = 14;
const int OW = 14;

void convolution(int input_image[H][W], int kernel[K][K], int output_image[OH][OW])
{
    int i;
    int j;
    int ki;
    int kj;
    int acc;
    for (i = 0; i < OH; i++) {
        for (j = 0; j < OW; j++) {
            acc = 0;
            for (ki = 0; ki < K; ki++) {
                for (kj = 0; kj < K; kj++) {
                    acc = acc + input_image[i + ki][j + kj] * kernel[ki][kj];
                }
            }
            output_image[i][j] = acc;
        }
    }
}
